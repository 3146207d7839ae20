#include "cli.hpp"

int main(int argc, char** argv) { return lowrank::cli::run(argc, argv); }
