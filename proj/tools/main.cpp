#include "bprelab/experiments.hpp"

int main(int argc, char** argv) {
  return bprelab::experiments::run_cli(argc, argv);
}
