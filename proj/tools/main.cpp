#include "cli.hpp"

int main(int argc, char** argv) { return ratcov::cli::run(argc, argv); }
