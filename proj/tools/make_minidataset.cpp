// Regenerates the synthetic mini-dataset: make_minidataset <output root>

#include "bopeval/error.hpp"
#include "bopeval/minidataset.hpp"

#include <iostream>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_minidataset <output root>\n";
    return 1;
  }
  try {
    bopeval::write_minidataset(bopeval::build_minidataset(), argv[1]);
  } catch (const bopeval::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
