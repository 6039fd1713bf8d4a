#include "cli.hpp"

int main(int argc, char** argv) { return oamclone::cli::run_cli(argc, argv, std::cout, std::cerr); }
