#pragma once

// Umbrella header: lex -> parse -> resolve -> compile.

#include "memax/axial.hpp"
#include "memax/embedding.hpp"
#include "memax/error.hpp"
#include "memax/ir.hpp"
#include "memax/json_emit.hpp"
#include "memax/lexer.hpp"
#include "memax/parser.hpp"
#include "memax/resolver.hpp"
#include "memax/sql.hpp"
