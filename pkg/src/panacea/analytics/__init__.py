from .lda import TopicModel, lda_fit, representative_tweet, topic_top_words
from .panels import (
    Gazetteer,
    SpreadRecord,
    STANCE_COLORS,
    geo_points,
    propagation_graph_export,
    spread_metrics,
    tweet_count_series,
    word_cloud,
)
from .pca import PcaResult, pca_project
from .sentiment import (
    SentimentLabel,
    SentimentLexicon,
    SentimentScore,
    label_for,
    sentiment,
)

__all__ = [
    "TopicModel", "lda_fit", "representative_tweet", "topic_top_words",
    "Gazetteer", "SpreadRecord", "STANCE_COLORS", "geo_points",
    "propagation_graph_export", "spread_metrics", "tweet_count_series",
    "word_cloud",
    "PcaResult", "pca_project",
    "SentimentLabel", "SentimentLexicon", "SentimentScore", "label_for",
    "sentiment",
]
