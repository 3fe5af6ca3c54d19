// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "test_util.hpp"
#include "textforge/ops.hpp"

using namespace textforge;

TEST(Tensor, SharedHandleAliasesStorage) {
  Tensor a = Tensor::from({2}, {1, 2});
  Tensor b = a;
  b.data()[0] = 5;
  EXPECT_EQ(a.values()[0], 5);
  EXPECT_TRUE(a.same_storage(b));
  Tensor c = a.detach_copy();
  c.data()[0] = 0;
  EXPECT_EQ(a.values()[0], 5);
  EXPECT_FALSE(a.same_storage(c));
}

TEST(Tensor, ShapeHelpers) {
  EXPECT_EQ(shape_numel({}), 1);
  EXPECT_EQ(shape_numel({2, 3, 4}), 24);
  EXPECT_EQ(shape_numel({3, 0}), 0);
  EXPECT_EQ(Tensor::scalar(2.5f).item(), 2.5f);
}

TEST(Ops, MatmulValuesAndGradients) {
  // a[2,3] b[3,2]
  Tensor a = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6}, true);
  Tensor b = Tensor::from({3, 2}, {1, 0, 0, 1, 1, 1}, true);
  Tensor y = ops::matmul(a, b);
  ASSERT_EQ(y.shape(), (Shape{2, 2}));
  EXPECT_EQ(y.values(), (std::vector<float>{4, 5, 10, 11}));
  backward(ops::sum(y));
  // dL/da = 1 * b^T row sums; dL/db = a^T * 1.
  EXPECT_EQ(std::vector<float>(a.grad().begin(), a.grad().end()), (std::vector<float>{1, 1, 2, 1, 1, 2}));
  EXPECT_EQ(std::vector<float>(b.grad().begin(), b.grad().end()), (std::vector<float>{5, 5, 7, 7, 9, 9}));
}

TEST(Ops, MatmulShapeMismatchThrows) {
  EXPECT_TF_ERROR(ops::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), ErrorCode::ShapeMismatch);
}

TEST(Ops, GradientsAccumulateAcrossUses) {
  Tensor x = Tensor::from({2}, {3, -1}, true);
  Tensor y = ops::sum(ops::add(ops::mul(x, x), x));  // x^2 + x
  backward(y);
  EXPECT_FLOAT_EQ(x.grad()[0], 7.0f);
  EXPECT_FLOAT_EQ(x.grad()[1], -1.0f);
}

TEST(Ops, ElementwiseActivations) {
  Tensor x = Tensor::from({3}, {-1, 0, 2});
  const auto r = ops::relu(x).values();
  EXPECT_EQ(r, (std::vector<float>{0, 0, 2}));
  EXPECT_NEAR(ops::sigmoid(x).values()[1], 0.5f, 1e-7);
  EXPECT_NEAR(ops::tanh(x).values()[2], std::tanh(2.0f), 1e-7);
  EXPECT_EQ(ops::elementwise(ops::Elementwise::Add, x, x).values(), (std::vector<float>{-2, 0, 4}));
}

TEST(Ops, AddBiasBroadcastsOverRows) {
  Tensor x = Tensor::zeros({2, 2}, true);
  Tensor b = Tensor::from({2}, {1, 2}, true);
  Tensor y = ops::add_bias(x, b);
  EXPECT_EQ(y.values(), (std::vector<float>{1, 2, 1, 2}));
  backward(ops::sum(y));
  EXPECT_EQ(std::vector<float>(b.grad().begin(), b.grad().end()), (std::vector<float>{2, 2}));
}

TEST(Ops, ConcatLastAxis) {
  Tensor a = Tensor::from({2, 1}, {1, 2}, true);
  Tensor b = Tensor::from({2, 2}, {3, 4, 5, 6}, true);
  const Tensor parts[] = {a, b};
  Tensor y = ops::concat(parts);
  EXPECT_EQ(y.shape(), (Shape{2, 3}));
  EXPECT_EQ(y.values(), (std::vector<float>{1, 3, 4, 2, 5, 6}));
  backward(ops::sum(ops::mul(y, Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6}))));
  EXPECT_EQ(std::vector<float>(a.grad().begin(), a.grad().end()), (std::vector<float>{1, 4}));
  EXPECT_EQ(std::vector<float>(b.grad().begin(), b.grad().end()), (std::vector<float>{2, 3, 5, 6}));
}

TEST(Ops, EmbeddingLookupScattersRepeatedIds) {
  Tensor table = Tensor::from({3, 2}, {0, 1, 2, 3, 4, 5}, true);
  IdTensor ids({1, 3}, {2, 0, 2});
  Tensor y = ops::embedding_lookup(table, ids);
  EXPECT_EQ(y.shape(), (Shape{1, 3, 2}));
  EXPECT_EQ(y.values(), (std::vector<float>{4, 5, 0, 1, 4, 5}));
  backward(ops::sum(y));
  EXPECT_EQ(std::vector<float>(table.grad().begin(), table.grad().end()), (std::vector<float>{1, 1, 0, 0, 2, 2}));
  EXPECT_TF_ERROR(ops::embedding_lookup(table, IdTensor({1}, {3})), ErrorCode::IdOutOfRange);
}

TEST(Ops, SoftmaxCrossEntropyHandValue) {
  Tensor logits = Tensor::from({2, 2}, {0, 0, 1, 3}, true);
  const std::int32_t t[] = {1, 0};
  Tensor loss = ops::softmax_cross_entropy(logits, t);
  const double want = 0.5 * (std::log(2.0) + (std::log(std::exp(1.0) + std::exp(3.0)) - 1.0));
  EXPECT_NEAR(loss.item(), want, 1e-6);
  backward(loss);
  EXPECT_NEAR(logits.grad()[0], 0.25, 1e-6);
  EXPECT_NEAR(logits.grad()[1], -0.25, 1e-6);
}

TEST(Ops, SoftmaxCrossEntropyMaskAndErrors) {
  Tensor logits = Tensor::from({2, 2}, {0, 0, 1, 3}, true);
  const std::int32_t t[] = {1, 0};
  const std::uint8_t mask[] = {1, 0};
  EXPECT_NEAR(ops::softmax_cross_entropy(logits, t, mask).item(), std::log(2.0), 1e-6);
  const std::uint8_t none[] = {0, 0};
  EXPECT_TF_ERROR(ops::softmax_cross_entropy(logits, t, none), ErrorCode::EmptyLoss);
  const std::int32_t bad[] = {2, 0};
  EXPECT_TF_ERROR(ops::softmax_cross_entropy(logits, bad), ErrorCode::TargetOutOfRange);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  Rng rng(3);
  Tensor p = ops::softmax(tf_test::random_tensor(rng, {4, 5}));
  for (int r = 0; r < 4; ++r) {
    float s = 0;
    for (int c = 0; c < 5; ++c) s += p.values()[r * 5 + c];
    EXPECT_NEAR(s, 1.0f, 1e-6);
  }
}

TEST(Ops, ConvRejectsEmptyRows) {
  Tensor x = Tensor::zeros({1, 3, 2});
  Tensor f = Tensor::zeros({2, 2, 1});
  const std::int64_t lens[] = {0};
  EXPECT_TF_ERROR(ops::conv1d_maxpool(x, f, lens), ErrorCode::EmptySequence);
}

TEST(Ops, LstmPaddingDoesNotChangeValidOutputs) {
  Rng rng(11);
  const std::int64_t D = 3, H = 2;
  Tensor wi = tf_test::random_tensor(rng, {D, 4 * H}), wh = tf_test::random_tensor(rng, {H, 4 * H}),
         b = tf_test::random_tensor(rng, {4 * H});
  Tensor x3 = tf_test::random_tensor(rng, {1, 3, D});
  std::vector<float> padded = x3.values();
  padded.resize(5 * D, 7.0f);
  Tensor x5 = Tensor::from({1, 5, D}, padded);
  const std::int64_t l3[] = {3};
  for (bool rev : {false, true}) {
    Tensor a = ops::lstm(x3, wi, wh, b, l3, rev);
    Tensor c = ops::lstm(x5, wi, wh, b, l3, rev);
    for (int i = 0; i < 3 * H; ++i) EXPECT_EQ(a.values()[i], c.values()[i]) << rev;
  }
}

TEST(Ops, NoGradGuardSkipsTape) {
  Tensor x = Tensor::from({1}, {2}, true);
  {
    NoGradGuard g;
    EXPECT_FALSE(grad_mode_enabled());
    Tensor y = ops::mul(x, x);
    backward(ops::sum(y));
  }
  EXPECT_TRUE(grad_mode_enabled());
  EXPECT_FALSE(x.has_grad());
}
