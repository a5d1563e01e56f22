#pragma once

#include "etm/clustering.hpp"
#include "etm/corpus.hpp"
#include "etm/distance.hpp"
#include "etm/embeddings.hpp"
#include "etm/evaluation.hpp"
#include "etm/matrix.hpp"
#include "etm/model_io.hpp"
#include "etm/pipeline.hpp"
#include "etm/random.hpp"
#include "etm/synthetic.hpp"
#include "etm/topic_model.hpp"
