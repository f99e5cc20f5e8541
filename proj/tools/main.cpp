#include "commands.hpp"

int main(int argc, char** argv) { return catmap::cli::main_entry(argc, argv); }
