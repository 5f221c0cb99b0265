#pragma once

namespace iiaffine::cli {

inline int run(int, char**) { return 2; } // placeholder until the CLI lands

} // namespace iiaffine::cli
