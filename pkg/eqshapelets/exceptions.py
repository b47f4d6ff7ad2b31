class EqShapeletsException(Exception):
    """Базовое исключение EqShapelets"""


class UsageError(EqShapeletsException):
    """Некорректные аргументы или конфигурация"""


class DataError(EqShapeletsException):
    """Некорректные или отсутствующие входные данные"""


class LengthMismatchError(UsageError):
    """Длины подпоследовательностей не совпадают"""


class SeriesTooShortError(UsageError):
    """Шейплет или окно длиннее временного ряда"""


class SingleClassError(UsageError):
    """В обучающем наборе присутствует только один класс"""


class NyquistError(UsageError):
    """Полоса фильтра выходит за частоту Найквиста"""


class SampleRateMismatchError(UsageError):
    """Сегменты записаны с разной частотой дискретизации"""


class OverlappingSegmentsError(UsageError):
    """Сегменты записи перекрываются во времени"""


class DecimationFactorError(UsageError):
    """Коэффициент прореживания не является целым числом"""


class DimensionMismatchError(UsageError):
    """Размерность вектора признаков не совпадает с моделью"""


class ConfigError(UsageError):
    """Ошибка в файле конфигурации или в переопределении параметра"""


class WaveformFormatError(DataError):
    """Файл волновой формы повреждён или имеет неизвестный формат"""


class ModelFormatError(DataError):
    """Файл шейплетов или модели повреждён или имеет неизвестную версию"""


class MissingInputError(DataError):
    """Входной файл или каталог не найден"""
