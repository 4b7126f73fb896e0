#include <iostream>

#include "polymix/cli.hpp"

int main(int argc, char** argv)
{
    return polymix::cli::run(argc, argv, std::cout, std::cerr);
}
