#pragma once

#include "context.hpp"
#include "coupling.hpp"
#include "derivative.hpp"
#include "multivector.hpp"
#include "normal_form.hpp"
#include "operator.hpp"
#include "parse.hpp"
#include "poisson.hpp"
#include "poly.hpp"
#include "rational.hpp"
#include "render.hpp"
#include "serialize.hpp"
#include "word.hpp"
