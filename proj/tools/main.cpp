#include "cse/cli.hpp"

int main(int argc, char** argv) { return cse::cli::run(argc, argv); }
