"""Trace-driven simulator and hybrid controllers for adaptive live streaming"""
from . import traces, config, qoe, predictor, playback, bitrate, framedrop, simulator, controllers, harness, generation
