#include "cli.hpp"

int main(int argc, char** argv) { return effdio::cli::run(argc, argv); }
