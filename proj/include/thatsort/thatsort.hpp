#pragma once

#include "thatsort/analysis.hpp"
#include "thatsort/corpus.hpp"
#include "thatsort/deps.hpp"
#include "thatsort/error.hpp"
#include "thatsort/relabel.hpp"
#include "thatsort/tagger/model.hpp"
#include "thatsort/text.hpp"
