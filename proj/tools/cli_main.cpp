#include <cstdio>

#include "splatgraph.h"

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fprintf(stderr, "splatgraph %s: command-line interface not wired up yet\n",
                 sg_version());
    return 2;
}
