from .manager import SynthManager, gen_learning_set, gen_record, read_truth, wavelet, write_truth

__all__ = ["SynthManager", "gen_learning_set", "gen_record", "read_truth", "wavelet", "write_truth"]
