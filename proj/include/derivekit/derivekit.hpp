// Umbrella include.
#pragma once

#include "derivekit/env.hpp"
#include "derivekit/genctor.hpp"
#include "derivekit/induction.hpp"
#include "derivekit/kernel.hpp"
#include "derivekit/pretty.hpp"
#include "derivekit/session.hpp"
#include "derivekit/sexp.hpp"
#include "derivekit/subterm.hpp"
#include "derivekit/surface.hpp"
#include "derivekit/term.hpp"
