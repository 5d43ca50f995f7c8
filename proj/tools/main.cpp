#include "cli_app.hpp"

int main(int argc, char** argv) { return bernstein::cli::run_cli(argc, argv); }
