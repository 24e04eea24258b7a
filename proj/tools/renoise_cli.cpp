#include "renoise/cli.hpp"

int main(int argc, char** argv) { return renoise::run_cli(argc, argv); }
