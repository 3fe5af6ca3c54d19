// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "textforge/error.hpp"
#include "textforge/rng.hpp"
#include "textforge/tensor.hpp"

namespace tf_test {

inline std::vector<float> random_values(textforge::Rng& rng, std::size_t n, float lo = -1.0f, float hi = 1.0f) {
  std::vector<float> v(n);
  rng.fill_uniform(v, lo, hi);
  return v;
}

inline textforge::Tensor random_tensor(textforge::Rng& rng, textforge::Shape shape, bool grad = false) {
  const auto n = static_cast<std::size_t>(textforge::shape_numel(shape));
  return textforge::Tensor::from(std::move(shape), random_values(rng, n), grad);
}

/// Random UTF-8 text mixing ASCII words, punctuation, unicode letters and
/// unicode spaces. Never contains tab, CR or LF.
inline std::string random_text(textforge::Rng& rng, std::size_t max_pieces = 12) {
  static const char* const pieces[] = {"a",  "Bc",  "DEF", "xyZ", "9",  "42", ",",  ".",      "'",      "?",
                                       " ",  "  ",  "-",   "(",   "é",  "Ünï", "日本", "\xc2\xa0", "\xe3\x80\x80", "oov",
                                       "Paris", "LONDON", "refund", "x1y", "_", "\xf0\x9f\x99\x82"};
  const std::size_t n = static_cast<std::size_t>(rng.below(max_pieces + 1));
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += pieces[rng.below(std::size(pieces))];
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("textforge_" + tag + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace tf_test

#define EXPECT_TF_ERROR(stmt, code_)                                                   \
  do {                                                                                 \
    try {                                                                              \
      stmt;                                                                            \
      ADD_FAILURE() << "expected " << textforge::error_code_name(code_) << ", got none"; \
    } catch (const textforge::Error& e_) {                                             \
      EXPECT_EQ(e_.code(), code_) << e_.what();                                        \
    }                                                                                  \
  } while (0)
