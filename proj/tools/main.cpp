#include "segaudit/cli.hpp"

int main(int argc, char** argv) { return segaudit::cli::run(argc, argv); }
