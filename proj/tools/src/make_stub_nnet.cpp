// Writes the built-in stub ACAS Xu network under the public file naming,
// one copy per previous advisory.

#include <filesystem>
#include <iostream>
#include <string>

#include "explorer/acas.hpp"
#include "explorer/io.hpp"
#include "explorer/nnet.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: explorer_make_stub_nnet <output-dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const std::string text = explorer::to_nnet_text(
      explorer::make_stub_acas_network(),
      "Stub ACAS Xu network: hand-set weights, not the original tables");
  for (int prev = 1; prev <= 5; ++prev) {
    explorer::write_text_file(dir / ("ACASXU_run2a_" + std::to_string(prev) + "_1_batch_2000.nnet"), text);
  }
  return 0;
}
