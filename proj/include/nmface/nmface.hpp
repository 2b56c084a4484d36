#pragma once

#include "nmface/compile.hpp"
#include "nmface/emotion.hpp"
#include "nmface/error.hpp"
#include "nmface/facs.hpp"
#include "nmface/format.hpp"
#include "nmface/grid.hpp"
#include "nmface/layering.hpp"
#include "nmface/lexicon.hpp"
#include "nmface/notation.hpp"
#include "nmface/reference_picker.hpp"
