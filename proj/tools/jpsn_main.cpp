#include "jpsn/cli.hpp"

int main(int argc, char** argv) { return jpsn::run_cli(argc, argv); }
