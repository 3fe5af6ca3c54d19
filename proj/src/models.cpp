// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include "textforge/models.hpp"

#include "textforge/error.hpp"

namespace textforge {

using nlohmann::json;

std::string_view head_kind_name(HeadKind k) { return k == HeadKind::Doc ? "doc" : "word"; }

ModelInputs prepare_inputs(const Batch& batch) {
  ModelInputs in;
  const auto B = batch.batch_size();
  if (batch.max_len() == 0) {
    const auto C = batch.char_ids.shape.size() == 3 ? batch.char_ids.shape[2] : 0;
    in.token_ids = IdTensor::zeros({B, 1});
    in.char_ids = IdTensor::zeros({B, 1, C});
    in.cap_ids = IdTensor::zeros({B, 1});
    in.gaz_ids = IdTensor::zeros({B, 1});
  } else {
    in.token_ids = batch.token_ids;
    in.char_ids = batch.char_ids;
    in.cap_ids = batch.cap_ids;
    in.gaz_ids = batch.gaz_ids;
  }
  in.lengths.reserve(batch.lengths.size());
  for (auto len : batch.lengths) in.lengths.push_back(std::max<std::int64_t>(1, len));
  return in;
}

// ---------------------------------------------------------------------------

SingleTaskModel::SingleTaskModel(HeadKind kind, std::shared_ptr<TokenEmbedding> embedding,
                                 std::shared_ptr<Representation> representation,
                                 std::shared_ptr<MlpDecoder> decoder,
                                 std::shared_ptr<Module> output)
    : kind_(kind) {
  if (representation->input_dim() != embedding->output_dim()) {
    throw Error(ErrorCode::ShapeMismatch,
                "embedding dim " + std::to_string(embedding->output_dim()) +
                    " feeds representation expecting " + std::to_string(representation->input_dim()));
  }
  if (decoder->input_dim() != representation->output_dim()) {
    throw Error(ErrorCode::ShapeMismatch,
                "representation dim " + std::to_string(representation->output_dim()) +
                    " feeds decoder expecting " + std::to_string(decoder->input_dim()));
  }
  const bool per_token = kind == HeadKind::Word;
  if (representation->per_token() != per_token) {
    throw Error(ErrorCode::SchemaViolation,
                representation->type_name() + " cannot feed a " + std::string(head_kind_name(kind)) +
                    " head");
  }
  const std::string expected_output = per_token ? "word_tagging_output" : "classification_output";
  if (output->type_name() != expected_output) {
    throw Error(ErrorCode::SchemaViolation,
                "a " + std::string(head_kind_name(kind)) + " head needs " + expected_output);
  }
  add_child("embedding", std::move(embedding));
  add_child("representation", std::move(representation));
  add_child("decoder", std::move(decoder));
  add_child("output", std::move(output));
}

json SingleTaskModel::build_spec() const {
  return {{"type", type_name()},
          {"head", head_kind_name(kind_)},
          {"embedding", embedding().build_spec()},
          {"representation", representation().build_spec()},
          {"decoder", decoder().build_spec()},
          {"output", output_layer().build_spec()}};
}

Tensor SingleTaskModel::logits(const Batch& batch) const {
  const ModelInputs in = prepare_inputs(batch);
  Tensor x = embedding().forward(in.token_ids, in.char_ids, in.cap_ids, in.gaz_ids);
  Tensor r = representation().forward(x, in.lengths);
  return decoder().forward(r);
}

Tensor SingleTaskModel::loss(const Batch& batch) const {
  Tensor z = logits(batch);
  if (kind_ == HeadKind::Doc) {
    if (!batch.doc_labels) throw Error(ErrorCode::InvalidArgument, "batch has no document labels");
    return ops::softmax_cross_entropy(z, *batch.doc_labels);
  }
  if (!batch.word_labels) throw Error(ErrorCode::InvalidArgument, "batch has no word labels");
  const auto B = z.dim(0), T = z.dim(1), C = z.dim(2);
  Tensor flat = ops::reshape(z, {B * T, C});
  if (batch.max_len() == 0) {
    const std::vector<std::int32_t> targets(static_cast<std::size_t>(B * T), 0);
    const std::vector<std::uint8_t> mask(static_cast<std::size_t>(B * T), 0);
    return ops::softmax_cross_entropy(flat, targets, mask);
  }
  return ops::softmax_cross_entropy(flat, batch.word_labels->data, batch.mask);
}

std::vector<Prediction> SingleTaskModel::predict(const Batch& batch) const {
  NoGradGuard guard;
  Tensor probs = ops::softmax(logits(batch));
  const auto C = probs.dim(-1);
  const auto values = probs.data();
  std::vector<Prediction> out(static_cast<std::size_t>(batch.batch_size()));
  for (std::int64_t i = 0; i < batch.batch_size(); ++i) {
    Prediction& p = out[static_cast<std::size_t>(i)];
    p.num_classes = C;
    const std::int64_t rows = kind_ == HeadKind::Doc ? 1 : batch.lengths[i];
    const std::int64_t T = kind_ == HeadKind::Doc ? 1 : probs.dim(1);
    for (std::int64_t t = 0; t < rows; ++t) {
      const auto row = values.subspan(static_cast<std::size_t>((i * T + t) * C), static_cast<std::size_t>(C));
      p.labels.push_back(argmax(row));
      p.scores.insert(p.scores.end(), row.begin(), row.end());
    }
  }
  return out;
}

const SingleTaskModel& SingleTaskModel::head(HeadKind kind) const {
  if (kind != kind_) {
    throw Error(ErrorCode::InvalidArgument,
                "model has no " + std::string(head_kind_name(kind)) + " head");
  }
  return *this;
}

// ---------------------------------------------------------------------------

MultiTaskModel::MultiTaskModel(std::shared_ptr<SingleTaskModel> doc,
                               std::shared_ptr<SingleTaskModel> word, std::vector<std::string> shared,
                               std::vector<float> loss_weights)
    : shared_(std::move(shared)), loss_weights_(std::move(loss_weights)) {
  if (loss_weights_.size() != 2) {
    throw Error(ErrorCode::MultiTaskArity, "joint model needs one loss weight per task");
  }
  add_child("doc", std::move(doc));
  add_child("word", std::move(word));
}

json MultiTaskModel::build_spec() const {
  return {{"type", type_name()},
          {"doc", head(HeadKind::Doc).build_spec()},
          {"word", head(HeadKind::Word).build_spec()},
          {"shared", shared_},
          {"loss_weights", loss_weights_}};
}

const SingleTaskModel& MultiTaskModel::head(HeadKind kind) const {
  return child_as<SingleTaskModel>(kind == HeadKind::Doc ? "doc" : "word");
}

Tensor MultiTaskModel::loss(const Batch& batch) const {
  if (batch.task_id < 0 || batch.task_id > 1) {
    throw Error(ErrorCode::MultiTaskArity, "task id " + std::to_string(batch.task_id) + " out of range");
  }
  const auto kind = batch.task_id == 0 ? HeadKind::Doc : HeadKind::Word;
  return ops::scale(head(kind).loss(batch), loss_weight(batch.task_id));
}

std::shared_ptr<MultiTaskModel> compose_multitask(std::shared_ptr<SingleTaskModel> doc,
                                                  std::shared_ptr<SingleTaskModel> word,
                                                  const std::vector<std::string>& shared,
                                                  std::vector<float> loss_weights) {
  for (const auto& path : shared) {
    auto a = doc->child(path);
    auto b = word->child(path);
    if (!a || !b) {
      throw Error(ErrorCode::IncompatibleShare, "shared path '" + path + "' is missing in " +
                                                    (a ? "the word model" : "the doc model"));
    }
    if (a->build_spec() != b->build_spec()) {
      throw Error(ErrorCode::IncompatibleShare, "modules at '" + path + "' differ: " +
                                                    a->build_spec().dump() + " vs " +
                                                    b->build_spec().dump());
    }
    word->replace_child(path, a);
  }
  return std::make_shared<MultiTaskModel>(std::move(doc), std::move(word), shared,
                                          std::move(loss_weights));
}

// ---------------------------------------------------------------------------

namespace {

void check_declared_dim(const ComponentConfig& cfg, std::int64_t actual) {
  const auto declared = cfg.get_int("input_dim");
  if (declared != 0 && declared != actual) {
    throw Error(ErrorCode::ShapeMismatch, cfg.name + " declares input_dim " + std::to_string(declared) +
                                              " but receives " + std::to_string(actual));
  }
}

}  // namespace

std::shared_ptr<SingleTaskModel> build_single_task_model(const ComponentConfig& cfg, HeadKind kind,
                                                         const ModelBuildContext& ctx) {
  const Vocabs& v = *ctx.vocabs;
  const auto& ecfg = cfg.child("embedding");
  TokenEmbeddingSpec es;
  es.word_vocab = static_cast<std::int64_t>(v.tokens.size());
  es.word_dim = ecfg.get_int("word_dim");
  es.char_vocab = static_cast<std::int64_t>(v.chars.size());
  es.char_dim = ecfg.get_int("char_dim");
  es.char_filters = ecfg.get_int("char_filters");
  es.char_widths = ecfg.get_ints("char_widths");
  es.highway_layers = ecfg.get_int("highway_layers");
  es.max_chars = ctx.max_chars;
  es.cap_vocab = static_cast<std::int64_t>(v.caps.size());
  es.cap_dim = ecfg.get_int("cap_dim");
  es.gaz_vocab = static_cast<std::int64_t>(v.gazetteer.size());
  es.gaz_dim = ecfg.get_int("gazetteer_dim");
  auto embedding = std::make_shared<TokenEmbedding>(es, ctx.rng);
  if (const auto pretrained = ecfg.get_string("pretrained_path"); !pretrained.empty() && ctx.load_pretrained) {
    if (!es.uses_words()) {
      throw Error(ErrorCode::SchemaViolation, "pretrained_path needs word_dim > 0");
    }
    std::filesystem::path p(pretrained);
    if (p.is_relative()) p = ctx.base_dir / p;
    Tensor table = embedding->own_params().front().second;
    load_pretrained_embeddings(p, v.tokens, table);
  }
  const auto e = embedding->output_dim();

  const auto& rcfg = cfg.child("representation");
  check_declared_dim(rcfg, e);
  std::shared_ptr<Representation> representation;
  if (rcfg.name == "docnn") {
    representation = std::make_shared<DocNN>(e, rcfg.get_int("kernel_num"),
                                              rcfg.get_ints("kernel_sizes"), ctx.rng);
  } else if (rcfg.name == "bilstm_attn") {
    representation = std::make_shared<BiLSTMAttn>(e, rcfg.get_int("hidden_dim"),
                                                   rcfg.get_int("attention_dim"), ctx.rng);
  } else if (rcfg.name == "bilstm_tagger") {
    representation = std::make_shared<BiLSTMTagger>(e, rcfg.get_int("hidden_dim"), ctx.rng);
  } else {
    throw Error(ErrorCode::UnknownComponent, "no representation builder for '" + rcfg.name + "'");
  }

  const auto& dcfg = cfg.child("decoder");
  check_declared_dim(dcfg, representation->output_dim());
  const auto classes = kind == HeadKind::Doc ? v.doc_labels.size() : v.word_labels.size();
  if (classes == 0) {
    throw Error(ErrorCode::EmptyCorpus,
                "no " + std::string(head_kind_name(kind)) + " labels in the training data");
  }
  auto decoder = std::make_shared<MlpDecoder>(representation->output_dim(), dcfg.get_ints("hidden_dims"),
                                              static_cast<std::int64_t>(classes), ctx.rng);

  const auto& ocfg = cfg.child("output");
  std::shared_ptr<Module> output;
  if (ocfg.name == "classification_output") {
    output = std::make_shared<ClassificationOutput>();
  } else if (ocfg.name == "word_tagging_output") {
    output = std::make_shared<WordTaggingOutput>();
  } else {
    throw Error(ErrorCode::UnknownComponent, "no output layer builder for '" + ocfg.name + "'");
  }
  return std::make_shared<SingleTaskModel>(kind, std::move(embedding), std::move(representation),
                                           std::move(decoder), std::move(output));
}

std::shared_ptr<TaskModel> build_model(const ComponentConfig& model_cfg, TaskKind task,
                                       const ModelBuildContext& ctx) {
  switch (task) {
    case TaskKind::DocClassification:
      return build_single_task_model(model_cfg, HeadKind::Doc, ctx);
    case TaskKind::WordTagging:
      return build_single_task_model(model_cfg, HeadKind::Word, ctx);
    case TaskKind::JointDocWord: {
      auto doc = build_single_task_model(model_cfg.child("doc"), HeadKind::Doc, ctx);
      auto word = build_single_task_model(model_cfg.child("word"), HeadKind::Word, ctx);
      return compose_multitask(std::move(doc), std::move(word), model_cfg.get_strings("shared"),
                               {static_cast<float>(model_cfg.get_float("doc_loss_weight")),
                                static_cast<float>(model_cfg.get_float("word_loss_weight"))});
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown task kind");
}

}  // namespace textforge
