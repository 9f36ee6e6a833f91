#include "cli_app.hpp"

int main(int argc, char** argv) { return maxreg::cli::run(argc, argv); }
