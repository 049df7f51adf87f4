#pragma once

namespace aep {

// Library semantic version.
const char* version();

// Content hash over the source tree at build time, stamped into every run
// directory so results stay traceable to the code that produced them.
const char* source_hash();

}  // namespace aep
