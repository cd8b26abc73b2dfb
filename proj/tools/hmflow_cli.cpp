#include "commands.hpp"

int main(int argc, char** argv) { return hmflow::cli::run(argc, argv); }
