#include "cqca/cli.hpp"

int main(int argc, char** argv) { return cqca::cli::run(argc, argv); }
