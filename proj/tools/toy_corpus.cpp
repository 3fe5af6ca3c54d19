// Copyright 2026 The TextForge Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "CLI11.hpp"
#include "textforge/error.hpp"
#include "textforge/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"writes the toy corpora and sample configs"};
  std::string out;
  std::uint64_t seed = 0;
  textforge::ToySizes sizes;
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--seed", seed, "corpus seed");
  app.add_option("--train", sizes.train, "training examples per corpus");
  app.add_option("--eval", sizes.eval, "evaluation examples per corpus");
  app.add_option("--test", sizes.test, "test examples per corpus");
  CLI11_PARSE(app, argc, argv);
  try {
    textforge::write_toy_workspace(out, seed, sizes);
  } catch (const textforge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote toy corpora and configs to " << out << "\n";
  return 0;
}
