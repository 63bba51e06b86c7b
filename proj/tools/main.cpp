#include "modal/cli.hpp"

int main(int argc, char** argv) { return modal::run_cli(argc, argv); }
