#pragma once

#include "error.hpp"
#include "linalg.hpp"
#include "group.hpp"
#include "rep.hpp"
#include "symbol.hpp"
#include "lab.hpp"
#include "io.hpp"
#include "cli.hpp"
