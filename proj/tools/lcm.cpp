#include "lcm/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return lcm::run_cli(argc, argv, std::cout, std::cerr);
}
