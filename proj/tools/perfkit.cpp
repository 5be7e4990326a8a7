#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return perfkit::cli::run(argc, argv, std::cout, std::cerr);
}
