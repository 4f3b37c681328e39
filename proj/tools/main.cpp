// Apache License, Version 2.0, refer to LICENSE.txt

#include "cli.hpp"

int main(int argc, char** argv) { return mmnl::cli::run(argc, argv); }
