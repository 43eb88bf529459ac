// Copyright 2026 The Hyperdisc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hyperdisc: command-line front end for the hypernym discovery pipeline.
//
//   hyperdisc <stage> [--config FILE] [--key value ...]
//   hyperdisc pipeline --config FILE
//   hyperdisc make-synthetic --out-dir DIR [--seed N]

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hyperdisc/pipeline.hpp"
#include "hyperdisc/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hypernym discovery from a POS-tagged corpus"};
  app.require_subcommand(1);

  std::string config_file;
  std::map<std::string, std::optional<std::string>> overrides;
  app.add_option("--config", config_file, "flat key=value configuration file");
  for (const auto& key : hyperdisc::config_keys()) {
    const std::string name(key.name);
    std::string help(key.help);
    if (!key.default_value.empty()) help += " [default: " + std::string(key.default_value) + "]";
    app.add_option("--" + name, overrides[name], help);
  }

  const std::map<std::string, std::string> descriptions = {
      {"normalize", "write the normalized corpus"},
      {"extract-hearst", "write the Hearst pattern corpus"},
      {"extract-isa", "write the IS-A pattern corpus"},
      {"cooc-index", "count paragraph co-occurrences for the query terms"},
      {"train-embedding", "train CBOW embeddings on the normalized corpus"},
      {"fit-phi", "fit the hyponym-to-hypernym projection on training pairs"},
      {"predict", "rank candidates from all four sources and merge them"},
      {"evaluate", "score predictions (MRR, MAP, P@k)"},
      {"pipeline", "run every stage in order"},
  };
  std::map<std::string, CLI::App*> stage_commands;
  for (const auto& [name, description] : descriptions) {
    auto* sub = app.add_subcommand(name, description);
    sub->fallthrough();
    stage_commands[name] = sub;
  }

  auto* synth = app.add_subcommand("make-synthetic", "write a planted-taxonomy benchmark");
  synth->fallthrough();
  hyperdisc::SyntheticSpec spec;
  synth->add_option("--categories", spec.categories, "number of planted hypernyms");
  synth->add_option("--hyponyms", spec.hyponyms_per_category, "hyponyms per hypernym");
  synth->add_option("--paragraphs", spec.min_paragraphs, "minimum corpus paragraphs");

  CLI11_PARSE(app, argc, argv);

  try {
    hyperdisc::PipelineConfig config;
    if (!config_file.empty()) config.merge_file(config_file);
    for (const auto& [key, value] : overrides) {
      if (value) config.set(key, *value);
    }

    if (synth->parsed()) {
      if (config.has("seed")) spec.seed = config.number<std::uint64_t>("seed");
      const auto dir = config.out_dir();
      const auto taxonomy = hyperdisc::make_synthetic_taxonomy(spec);
      const auto conf = hyperdisc::write_synthetic_benchmark(taxonomy, dir, spec.seed);
      std::cerr << "make-synthetic: " << taxonomy.corpus.size() << " paragraphs, "
                << taxonomy.train.size() << " training and " << taxonomy.test.size()
                << " test queries; configuration in " << conf.string() << '\n';
      return 0;
    }
    for (const auto& [name, sub] : stage_commands) {
      if (sub->parsed()) return hyperdisc::run(name, config, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "hyperdisc: error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
