#include <string>
#include <vector>

#include "starkecho/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return starkecho::run_cli(args);
}
