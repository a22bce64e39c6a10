#include "splatgraph.h"

#include <string>

namespace {
thread_local std::string g_last_error;
}

extern "C" {

const char* sg_version(void) { return "0.1.0"; }

const char* sg_last_error(void) { return g_last_error.c_str(); }

void sg_string_free(char* text) { delete[] text; }
}
