#include "biknn/cli.hpp"

int main(int argc, char** argv) { return biknn::run_cli(argc, argv); }
