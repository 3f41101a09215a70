#include "trajseek_cli.hpp"

int main(int argc, char** argv) { return trajseek::cli::dispatch(argc, argv); }
