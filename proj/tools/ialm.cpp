#include "ialm/experiments/cli.hpp"

int main(int argc, char** argv) { return ialm::run_cli(argc, argv); }
