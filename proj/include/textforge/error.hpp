// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace textforge {

enum class ErrorCode {
  // registry
  DuplicateRegistration,
  UnknownComponent,
  SchemaViolation,
  MalformedDocument,
  ShapeMismatch,
  // featurizer / data
  OverlappingEntries,
  EmptyCorpus,
  MultiTaskArity,
  MalformedData,
  FileNotFound,
  UnknownLabel,
  // tensor engine
  IdOutOfRange,
  EmptySequence,
  TargetOutOfRange,
  EmptyLoss,
  NotScalar,
  // model zoo
  NoStyleSelected,
  DimMismatch,
  MalformedLine,
  IncompatibleShare,
  // trainer
  NoGradient,
  EmptySplit,
  VersionMismatch,
  CorruptFile,
  // metrics
  LengthMismatch,
  EmptyEval,
  // exporter / runtime
  UnsupportedModule,
  VocabAlreadyBaked,
  CorruptGraph,
  InputTypeMismatch,
  EmptySampleSet,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

/// Exception carrying a machine-checkable error kind. Every failure the
/// library reports to callers goes through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace textforge
