#include "bromimo/cli.hpp"

int main(int argc, char** argv) { return bromimo::cli::cli_main(argc, argv); }
