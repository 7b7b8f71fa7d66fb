#include <CLI11.hpp>

#include <iostream>

#include "litmap/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the two-field synthetic corpus with its fixtures and config"};
  std::string out = "data/synthetic";
  litmap::SyntheticOptions opt;
  app.add_option("--out", out, "destination directory")->capture_default_str();
  app.add_option("--seed", opt.seed, "generator seed")->capture_default_str();
  app.add_option("--cross-citation", opt.cross_citation_prob, "probability of one cross-field citation per paper")
      ->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    const auto corpus = litmap::generate_synthetic(opt);
    litmap::write_synthetic(corpus, out);
    std::cout << "wrote " << corpus.papers.size() << " references to " << out << '\n';
  } catch (const std::exception& e) {
    std::cerr << "litmap-synth: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
