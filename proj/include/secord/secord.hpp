#pragma once

#include "secord/attack.hpp"
#include "secord/constraint.hpp"
#include "secord/datagen.hpp"
#include "secord/error.hpp"
#include "secord/io.hpp"
#include "secord/lexicon.hpp"
#include "secord/query.hpp"
#include "secord/remote.hpp"
#include "secord/rng.hpp"
#include "secord/robustness.hpp"
#include "secord/scoring.hpp"
#include "secord/text.hpp"
#include "secord/transform.hpp"
