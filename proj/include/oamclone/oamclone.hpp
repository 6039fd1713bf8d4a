// Umbrella header.
#pragma once

#include "oamclone/cloning.hpp"
#include "oamclone/elements.hpp"
#include "oamclone/errors.hpp"
#include "oamclone/experiment.hpp"
#include "oamclone/fock.hpp"
#include "oamclone/interference.hpp"
#include "oamclone/qudit.hpp"
#include "oamclone/version.hpp"
