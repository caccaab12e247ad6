#include "daelstm/cli/commands.hpp"

int main(int argc, char** argv) { return daelstm::cli::run_cli(argc, argv); }
