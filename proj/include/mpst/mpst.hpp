#pragma once

#include "mpst/core/context.hpp"
#include "mpst/core/error.hpp"
#include "mpst/core/names.hpp"
#include "mpst/core/ops.hpp"
#include "mpst/core/types.hpp"
#include "mpst/proc/probe.hpp"
#include "mpst/proc/process.hpp"
#include "mpst/proc/step.hpp"
#include "mpst/proc/typecheck.hpp"
#include "mpst/projection.hpp"
#include "mpst/safety.hpp"
#include "mpst/semantics.hpp"
#include "mpst/syntax/parser.hpp"
#include "mpst/syntax/pretty.hpp"
