#include <iostream>

#include "vemrcp/cli.hpp"

int main(int argc, char** argv)
{
    return vemrcp::cli_main(argc, argv, std::cout, std::cerr);
}
