#include "rankgap/cli.hpp"

int main(int argc, char** argv) { return rankgap::cli::cmd_dispatch(argc, argv); }
