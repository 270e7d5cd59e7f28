#include <suprox/cli.hpp>

int main(int argc, char** argv) { return suprox::cli::run(argc, argv); }
