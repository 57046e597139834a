#include "tailspec/cli.hpp"

int main(int argc, char** argv) { return tailspec::run_cli(argc, argv); }
