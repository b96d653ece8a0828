#include "ddugm_cli.hpp"

int main(int argc, char** argv) { return ddugm::cli::cli_main(argc, argv); }
