#include "corrobust/cli/app.hpp"

int main(int argc, char** argv) { return corrobust::cli::run(argc, argv); }
