// Copyright (c) 2026 dpmimo authors
//
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "dpmimo/cli.hpp"

int main(int argc, char** argv)
{
    return dpmimo::runCli(argc, argv, std::cout, std::cerr);
}
