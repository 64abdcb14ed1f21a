#include "xaspect/cli.hpp"

int main(int argc, char** argv) { return xaspect::run_cli(argc, argv); }
