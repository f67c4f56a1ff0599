#include "epkit/cli.hpp"

int main(int argc, char** argv) { return epkit::cli::run_cli(argc, argv); }
