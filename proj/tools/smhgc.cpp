#include "smhgc/cli/commands.hpp"

int main(int argc, char** argv) { return smhgc::cli::run(argc, argv); }
